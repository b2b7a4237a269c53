from hugkit.cli import main

raise SystemExit(main())
