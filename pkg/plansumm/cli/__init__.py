from .main_cli import build_parser, main
