"""
JSON documents for graphs and M-type coalgebras, validated against JSON Typedef
schemas before they are turned into hydra objects.

Reference: https://jsontypedef.com/docs/jtd-in-5-minutes/
"""

# Standard
from typing import Any, Dict, List, Tuple, Union
import json
import os

# Third Party
import jtd

# First Party
import alog

# Local
from .errors import ValidationError
from .graph import Apg, build, edges
from .mtype import LabelledApg, Signature

log = alog.use_channel("DOCS")

GRAPH_JTD_SCHEMA = jtd.Schema.from_dict(
    {
        "properties": {
            "node_count": {"type": "uint32"},
            "point": {"type": "uint32"},
            "edges": {"elements": {"elements": {"type": "uint32"}}},
        }
    }
)

MTYPE_JTD_SCHEMA = jtd.Schema.from_dict(
    {
        "properties": {
            "signature": {"values": {"type": "uint32"}},
            "coalgebra": {
                "properties": {
                    "point": {"type": "uint32"},
                    "nodes": {
                        "elements": {
                            "properties": {
                                "symbol": {"type": "string"},
                                "children": {"elements": {"type": "uint32"}},
                            }
                        }
                    },
                }
            },
        }
    }
)

# Python type hint equivalents of the schemas
GraphDocument = Dict[str, Union[int, List[List[int]]]]
MTypeDocument = Dict[str, Dict[str, Any]]

## Interface ###################################################################


def read_json(path: Union[str, os.PathLike]) -> Any:
    """Load a JSON file, reporting malformed JSON as a ValidationError"""
    with open(path, encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as err:
            raise ValidationError(f"{path} is not valid JSON: {err}") from err


def load_graph(doc: GraphDocument) -> Apg:
    """Build a graph from a document matching GRAPH_JTD_SCHEMA

    Args:
        doc:  GraphDocument
            {"node_count": n, "point": p, "edges": [[s, t], ...]}

    Returns:
        graph:  Apg
            The validated graph
    """
    _validate(GRAPH_JTD_SCHEMA, doc, "Graph")
    pairs = []
    for i, edge in enumerate(doc["edges"]):
        if len(edge) != 2:
            raise ValidationError(f"Edge {i} must be a [source, target] pair")
        pairs.append((edge[0], edge[1]))
    return build(doc["node_count"], pairs, doc["point"])


def graph_to_document(g: Apg) -> GraphDocument:
    return {
        "node_count": g.node_count,
        "point": g.point,
        "edges": [[source, target] for source, target in edges(g)],
    }


def load_mtype_document(doc: MTypeDocument) -> Tuple[Signature, LabelledApg]:
    """Build a signature and a coalgebra from a document matching
    MTYPE_JTD_SCHEMA. The signature's symbol order is the key order of the
    "signature" object.

    Args:
        doc:  MTypeDocument
            {"signature": {symbol: arity}, "coalgebra": {"point": p, "nodes": [...]}}

    Returns:
        signature:  Signature
            The signature
        coalgebra:  LabelledApg
            The validated labelled graph
    """
    _validate(MTYPE_JTD_SCHEMA, doc, "M-type")
    signature = Signature.of(doc["signature"])
    nodes = doc["coalgebra"]["nodes"]
    coalgebra = LabelledApg.build(
        signature,
        [node["symbol"] for node in nodes],
        [node["children"] for node in nodes],
        doc["coalgebra"]["point"],
    )
    return signature, coalgebra


## Impl ########################################################################


def _validate(schema: jtd.Schema, doc: Any, kind: str):
    log.debug2("Validating %s document", kind)
    validation_errors: List[jtd.ValidationError] = jtd.validate(
        schema=schema, instance=doc
    )
    if validation_errors:
        for validation_error in validation_errors:
            log.error("%s JSON validation error: %s", kind, validation_error)
        raise ValidationError(f"Invalid {kind} json")
