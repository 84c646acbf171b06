from dfci.cli import main

main()
