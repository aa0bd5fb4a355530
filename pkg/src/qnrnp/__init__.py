"""Two consecutive quadratic non-residues that are not primitive roots."""
