"""Unit conventions.

Internally every frequency is an angular frequency in rad/s and every time is
in seconds.  Configuration files carry plain Hz and ns; conversion happens once
at parse time through the helpers below.
"""

import math

TWO_PI = 2.0 * math.pi

HZ = TWO_PI
KHZ = 1e3 * TWO_PI
MHZ = 1e6 * TWO_PI
GHZ = 1e9 * TWO_PI

NS = 1e-9
PS = 1e-12


def hz_to_angular(f_hz: float) -> float:
    return TWO_PI * f_hz


def angular_to_hz(omega: float) -> float:
    return omega / TWO_PI
