"""Vector-space reasoning over Descriptions-and-Situations ontologies.

    >>> import dnsvec
    >>> model = dnsvec.Model.from_file("fixtures/fig.sandra")
    >>> v = model.encode({"id": "s1", "entities": [{"id": "e1", "roles": ["Circle"]}]})
    >>> model.deduce(v, mode="heaviside")
    array([0.5])
"""

from ._core import DnsvecError, Model, Ontology

__all__ = ["DnsvecError", "Model", "Ontology", "load"]
__version__ = "0.1.0"


def load(path):
    """Build a Model from an ontology file (.sandra or .json)."""
    return Model.from_file(str(path))
