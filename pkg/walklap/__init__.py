"""walklap: walk-based graph Laplacians, diffusion and return probabilities."""

__version__ = "1.0.0"
