"""
Physical and numerical constants shared across the kinetics package.
"""

import math


BOLTZMANN   = 1.380649e-23          # J/K, exact SI
SQRT_PI     = math.sqrt(math.pi)
SQRT_2PI    = math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Relative guard band kept between six-field evaluations and the window edges.
WINDOW_GUARD = 1e-9
