"""Stand-alone DIMACS / OPB solver: ``python -m robxp.solver INSTANCE``.

Prints ``s`` / ``v`` lines and exits 10 (satisfiable) or 20 (unsatisfiable).
"""

import sys

from .oracle import main

if __name__ == "__main__":
    sys.exit(main())
