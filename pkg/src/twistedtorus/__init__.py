"""twistedtorus - words, Seifert-fibered classification and surgery of twisted torus knots"""

__version__ = "0.1.0"
