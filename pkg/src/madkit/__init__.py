"""Differential morphing-attack-detection toolkit.

Subpackages:
  core      shared domain types, manifest schema and validation
  morph     landmark-driven morphing and demorphing
  protocol  pairing rules and comparison-trial enumeration
  degrade   reference-image post-processing chains
  features  embeddings, texture and landmark features
  classify  RBF-SVM classifier trained with SMO, score calibration
  metrics   detection / vulnerability metrics, histograms, MDS
  cli       command-line pipeline orchestration
"""

__version__ = "0.1.0"
