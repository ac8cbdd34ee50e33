# api/cli/__main__.py
import sys

from api.cli import main

sys.exit(main())
