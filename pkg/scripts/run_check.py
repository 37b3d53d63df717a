from shiftcheck.shift_tool import main


if __name__ == "__main__":
    main()
