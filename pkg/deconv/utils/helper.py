import json

import numpy as np


# JSON encoder for numpy scalars and arrays, and complex numbers as [re, im]
class NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, (complex, np.complexfloating)):
            return [float(obj.real), float(obj.imag)]
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        return super().default(obj)


def format_float(value) -> str:
    """17 significant digits; empty for missing values"""
    if value is None:
        return ""
    return format(float(value), ".17g")


def parse_float(text: str):
    return None if text is None or text.strip() == "" else float(text)
