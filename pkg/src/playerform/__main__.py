import sys

from playerform.cli import main

sys.exit(main())
