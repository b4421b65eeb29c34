"""Published averaged coordination numbers, as (p, q) for p + q*sqrt(d)."""

from typing import Dict, List, Tuple

from coordination_core.fields.quadfield import QuadRat

# k -> s_c(k) on the Ammann-Beenker tiling, d = 2
AMMANN_BEENKER: Dict[int, Tuple[int, int]] = {
    1: (4, 0), 2: (32, -16), 3: (-8, 16), 4: (24, -4), 5: (40, -12),
    6: (40, -8), 7: (-176, 148), 8: (444, -288), 9: (240, -140), 10: (-648, 492),
    11: (232, -128), 12: (508, -320), 13: (-272, 236), 14: (-556, 440), 15: (1540, -1040),
    16: (980, -640), 17: (-3064, 2224), 18: (1424, -948), 19: (812, -512), 20: (740, -456),
    21: (-3284, 2392), 22: (2172, -1464), 23: (4164, -2868), 24: (-8648, 6196), 25: (6836, -4752),
    26: (3164, -2152), 27: (-7972, 5728), 28: (1500, -968), 29: (4716, -3240), 30: (792, -460),
    31: (-10216, 7328), 32: (10500, -7320), 33: (7236, -5008), 34: (-18132, 12936), 35: (5356, -3672),
    36: (7328, -5064), 37: (2800, -1856), 38: (-19444, 13876), 39: (12416, -8652), 40: (21932, -15376),
}

# k -> s_c(k) on the shield tiling, d = 3
SHIELD: Dict[int, Tuple[int, int]] = {1: (8, -2), 2: (20, -6), 3: (64, -28), 4: (-46, 38)}

# k -> [(r^2, part)] on the shield tiling, each as (p, q, r)
SHIELD_CONTRIBUTIONS: Dict[int, List[Tuple[Tuple[int, int, int], Tuple[int, int, int]]]] = {
    1: [((2, -1, 1), (8, -2, 1))],
    2: [((4, -2, 1), (2, 0, 1)), ((6, -3, 1), (4, -2, 1)), ((1, 0, 1), (14, -4, 1))],
    3: [((1, 0, 1), (-6, 4, 1)), ((5, -2, 1), (10, -4, 1)), ((2, 0, 1), (48, -24, 1)), ((4, -1, 1), (12, -4, 1))],
    4: [
        ((4, -1, 1), (-6, 4, 1)),
        ((8, -3, 1), (-76, 44, 1)),
        ((3, 0, 1), (-12, 16, 3)),
        ((7, -2, 1), (60, -32, 3)),
        ((2, 1, 1), (12, -2, 1)),
        ((4, 0, 1), (24, -8, 3)),
    ],
}


def ammann_beenker_value(k: int) -> QuadRat:
    p, q = AMMANN_BEENKER[k]
    return QuadRat(p, q, 1, 2)


def shield_value(k: int) -> QuadRat:
    p, q = SHIELD[k]
    return QuadRat(p, q, 1, 3)


def shield_contributions(k: int) -> Dict[QuadRat, QuadRat]:
    return {QuadRat(*r_sq, 3): QuadRat(*part, 3) for r_sq, part in SHIELD_CONTRIBUTIONS[k]}
