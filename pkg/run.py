# run.py (in your main directory)
import sys

from rdlab.lab import main

if __name__ == "__main__":
    sys.exit(main())
