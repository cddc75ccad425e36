"""momentpair: matched-pair decomposition of Vlasov kinetic dynamics.

Exact layer: rational polynomial arithmetic (exactpoly), the Schouten
bracket on symmetric contravariant tensor fields with its s |><| n split
(schouten), and the phase-space function algebra with Hamiltonian vector
fields (phasealg).

Numerical layer: periodic 1D grids (gridcore), kinetic-moment Lie-Poisson
dynamics (momentdyn), a 1D-1V Vlasov-Poisson solver with the moment
decomposition of the density (kinetic), and the momentum-Vlasov one-form
formulation (momvlasov).  The scenario module provides the CLI.
"""

__version__ = "0.1.0"
