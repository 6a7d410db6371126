"""Frugal Lipschitz global optimisation: PRS, LIPO, AdaLIPO and their + variants."""
