"""
Defaults and tolerances used across the package.
"""


class Tolerances:
    # probabilities must sum to 1 within this before they are normalised
    PROB_SUM = 1e-12
    # abscissa tolerance of every bisection
    BISECT_XTOL = 1e-10
    # relative agreement required between the two bound parameterisations
    REWRITE_RTOL = 1e-9


class SweepDefaults:
    G_MIN = 0.0
    G_MAX = 0.054
    G_STEPS = 500
    SIGMAS = (0.0,)
    CLAMP_R_MAX = 2.2


class SimDefaults:
    PATHS = 200_000
    SEED = 20150917
    # auto horizon: omitted expected value below this fraction of the price
    HORIZON_RTOL = 1e-6
    # paths per random substream, at most
    BLOCK_PATHS = 4096
    # draws per random substream, at most; one path must fit in a block
    BLOCK_ELEMENTS = 1 << 21
    # Monte Carlo estimates pass when within this many standard errors
    PASS_SE = 3.0


class PlotDefaults:
    WIDTH = 640
    HEIGHT = 480
    MARGIN = 60
    G_TICK = 0.01
    R_TICK = 0.5
    SHADE = "#d3d3d3"
