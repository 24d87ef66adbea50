"""A small discrete-event NDN simulator for fetch experiments."""
from .sim import (SCENARIOS, SEGMENT_SIZE, Consumer, ConsumerMetrics, DataPacket, EdgeRouter,
                  Ingress, Interest, Metrics, Producer, Router, Scenario, Simulation,
                  Unsatisfiable, attach_consumers, prepare_content, run_fetch, scenario_dict)
from .topology import (DisconnectedGraph, Link, ParseError, Topology, load_topology,
                       parse_topology)

__all__ = [
    "SCENARIOS", "SEGMENT_SIZE", "Consumer", "ConsumerMetrics", "DataPacket", "EdgeRouter",
    "Ingress", "Interest", "Metrics", "Producer", "Router", "Scenario", "Simulation",
    "Unsatisfiable", "attach_consumers", "prepare_content", "run_fetch", "scenario_dict",
    "DisconnectedGraph", "Link", "ParseError", "Topology", "load_topology", "parse_topology",
]
