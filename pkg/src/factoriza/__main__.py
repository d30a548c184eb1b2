import sys

from src.factoriza.cli import main

sys.exit(main())
