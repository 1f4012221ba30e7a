from .dsl import ParseError, load_model, parse_model, serialize

__all__ = ["ParseError", "load_model", "parse_model", "serialize"]
