import sys

from c_period_lab.main import main

sys.exit(main())
