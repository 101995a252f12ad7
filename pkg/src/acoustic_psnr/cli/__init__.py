"""
Command-line interface: the `acoustic-psnr` typer application
"""

from .psnr_cli import app, load_detector

__all__ = ["app", "load_detector"]
