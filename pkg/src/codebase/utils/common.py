import copy
import math

import numpy as np


def jsonable(data):
    """Convert numpy values, tuples and non-finite floats for json.dumps

    inf / -inf / nan become the strings "inf", "-inf" and "nan".
    """
    if isinstance(data, dict):
        return {str(k): jsonable(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [jsonable(v) for v in data]
    if isinstance(data, np.ndarray):
        return [jsonable(v) for v in data.tolist()]
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        value = float(data)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return copy.deepcopy(data)


NON_FINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def restored(data):
    """Inverse of ``jsonable`` for the non-finite float strings"""
    if isinstance(data, dict):
        return {k: restored(v) for k, v in data.items()}
    if isinstance(data, list):
        return [restored(v) for v in data]
    if isinstance(data, str) and data in NON_FINITE:
        return NON_FINITE[data]
    return data


def merged(defaults, data):
    """Recursive dict merge, ``data`` wins"""
    ret = copy.deepcopy(defaults)
    for k, v in data.items():
        if isinstance(v, dict) and isinstance(ret.get(k), dict):
            ret[k] = merged(ret[k], v)
        else:
            ret[k] = copy.deepcopy(v)
    return ret
