#!/usr/bin/env python3
"""
NormScope - Port check and application startup script
"""

import argparse
import logging
import socket
import sys

import uvicorn

from app.config import settings

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def is_port_in_use(port: int) -> bool:
    """Check if a port is currently in use"""
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        return sock.connect_ex(('localhost', port)) == 0


def get_available_port(start_port: int) -> int:
    """Find an available port starting from start_port"""
    for port in range(start_port, start_port + 100):
        if not is_port_in_use(port):
            return port
    raise RuntimeError(f"No available port found in range {start_port}-{start_port + 99}")


def main():
    """Main entry point"""
    parser = argparse.ArgumentParser(description="Start the NormScope API")
    parser.add_argument("--port", "-p", type=int, default=settings.port,
                        help=f"Port to run the application on (default: {settings.port})")
    parser.add_argument("--allow-alternative", "-a", action="store_true",
                        help="Use the next free port when the target port is taken")
    parser.add_argument("--reload", action="store_true", help="Reload on code changes")
    args = parser.parse_args()

    port = args.port
    if is_port_in_use(port):
        if not args.allow_alternative:
            logger.error(f"Port {port} is in use; pass --allow-alternative to pick another")
            sys.exit(1)
        port = get_available_port(port + 1)
        logger.info(f"Using alternative port: {port}")

    logger.info(f"Starting {settings.app_name} on port {port}...")
    try:
        uvicorn.run("app.main:app", host=settings.host, port=port, reload=args.reload)
    except KeyboardInterrupt:
        logger.info("Application stopped by user.")


if __name__ == "__main__":
    main()
