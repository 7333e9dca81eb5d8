import numpy as np

INDEPENDENCE = 0
CLAYTON = 1
GUMBEL = 2
FRANK = 3
AMH = 4

# copula-scale samples are clipped into the open unit interval
TINY = float(np.finfo(np.float64).tiny)
ONE_MINUS = float(np.nextafter(1.0, 0.0))
