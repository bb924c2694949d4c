from .textio.cli import main

raise SystemExit(main())
