"""Two-tier diagnosis engine: inductive learners coupled to an ontology KB.

The statistical tier trains decision-tree, naive-Bayes, and neural-network
classifiers on tabular sensor data; the symbolic tier holds an ontology plus
Horn rules and closes them with a forward-chaining reasoner. The bridge
compiles trained trees and per-row predictions into rules and assertions, so
mission telemetry can be classified statistically and then diagnosed
symbolically with full provenance.
"""

__version__ = "0.1.0"
