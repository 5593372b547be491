"""Run the TreeHop CLI without installing the console script."""

from src.main import main

if __name__ == "__main__":
    main()
