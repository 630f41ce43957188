"""Diamond-lattice polypeptide modelling: exact chain geometry, lattice fits,
fold search, and quantum-search alphabet capacities."""

__version__ = "0.1.0"
