"""liftgap: exact lift-and-project machinery over product spaces.

Subpackages:
    exactlp  rational polyhedra, simplex with certificates, projection
    hull     feasible-point enumeration, V-polytopes, hull membership
    sa       level-k lift, linearization, projection, size bounds
    product  product sections, indicator coefficients, EF translation
    cfl      capacitated facility location instance family and verifications
    corelab  cores, conflict hypergraphs, chromatic size bounds
    cli      command line front end
"""

__version__ = "0.1.0"
