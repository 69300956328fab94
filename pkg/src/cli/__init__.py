"""Command line: smallfibers build | schedule | audit | eval | fiber | render-svg | verify-appendix"""
from .main import build_parser, main

__all__ = ['build_parser', 'main']
