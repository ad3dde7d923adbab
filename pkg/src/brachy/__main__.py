"""
Entrypoint module, in case you use `python -m brachy`.
"""
from brachy.cli import cli as main

if __name__ == "__main__":
    main()
