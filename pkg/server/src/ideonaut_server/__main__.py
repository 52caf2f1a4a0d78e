"""Launcher: python3 -m ideonaut_server --config server.json"""

from __future__ import annotations

import argparse
import sys

from ideonaut_server.app import create_app
from ideonaut_server.config import ServerConfigError, load_server_config


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ideonaut-server",
        description="Serve the ideonaut wire protocol backed by local models.",
    )
    parser.add_argument("--config", required=True, help="server config JSON file")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    args = parser.parse_args(argv)

    try:
        config = load_server_config(args.config)
        app = create_app(config)
    except ServerConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
