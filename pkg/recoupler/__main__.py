from recoupler.main import main

main()
