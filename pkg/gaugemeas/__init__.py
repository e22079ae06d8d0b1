"""
gaugemeas: higher-form gauging measurement of transversal gates on CSS codes.

GF(2) chain complexes and codes, an exact phased-CSS operator algebra, statevector
and tableau simulation, the gauging procedure with its fault-tolerance checks, and
builders for the torus, colour-code and twisted-gauge-theory instances.
"""

__version__ = "0.1.0"
