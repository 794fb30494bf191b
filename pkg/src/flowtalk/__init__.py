"""Desk-scale coarse-to-fine audio-driven character animation.

Low-resolution flow-matching generation, pose-guided high-resolution
refinement with prefix-latent anchoring, chunked long-video continuation,
and hand-specific reward fine-tuning, all trained and verified against a
procedurally generated synthetic world.
"""

__version__ = "0.1.0"
