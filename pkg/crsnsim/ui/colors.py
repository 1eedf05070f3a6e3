#!/usr/bin/env python3
"""
Rich-powered display utilities for crsnsim
"""

from rich.console import Console
from rich.text import Text

# Global console instances for consistent styling
console = Console()
error_console = Console(stderr=True)

BANNER_TEXT = r"""
  ___ ___  ___ _ __  ___(_)_ __ ___
 / __| '__|/ __| '_ \/ __| | '_ ` _ \
| (__| |   \__ \ | | \__ \ | | | | | |
 \___|_|   |___/_| |_|___/_|_| |_| |_|

   Energy-efficient channel access for clustered CR sensor networks
   ════════════════════════════════════════════════════════════════
"""


def print_banner():
    console.print(Text(BANNER_TEXT, style="cyan"))


def print_success(message: str):
    console.print(f"✅ {message}", style="green")


def print_error(message: str):
    """Errors go to standard error so CSV on stdout stays clean"""
    error_console.print(f"❌ {message}", style="red")


def print_info(message: str):
    console.print(f"ℹ️  {message}", style="cyan")
