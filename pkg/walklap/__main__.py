"""Запуск через: python -m walklap"""

import sys

from walklap.main import main

sys.exit(main())
