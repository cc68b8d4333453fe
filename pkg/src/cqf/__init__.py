"""Conceptual query formulation toolkit.

Disclose information over a fact-based conceptual schema: ranked
point-to-point path search with lazy MORE batches, spider (neighborhood)
queries, query by navigation, syntax-directed query construction,
verbalization, in-memory evaluation and SQL lowering.
"""

from .errors import CqfError
from .evaluator import Population, eval_expr, eval_path, eval_query_tree, parse_population
from .navigator import NavMove, NavNode, apply_move, moves, start_session, to_particle
from .pathfinder import (
    PathEnumerator,
    PpqResult,
    WeightedPath,
    combined_selected,
    concat_paths,
    more_paths,
    next_batch,
    open_enumeration,
    path_weight,
    run_ppq,
    select_alternative,
)
from .querybuilder import (
    QueryExpr,
    atom,
    combine,
    format_query_text,
    parse_query_text,
    placeholder,
    splice,
    validate_expr,
    verbalize_expr,
)
from .schema import (
    FactType,
    ObjectType,
    Role,
    SchemaGraph,
    SchemaPath,
    Step,
    adjacent_steps,
    importance_order,
    parse_schema,
    serialize_schema,
    validate_schema,
    verbalize_path,
)
# The spider() operation stays under cqf.spider so the module name keeps
# resolving; import it from there.
from .spider import (
    QueryTree,
    SpiderTree,
    attach_spider,
    extend_leaf,
    prune_branch,
    tree_paths,
)
from .sqlgen import emit_ddl, emit_sql, relational_map

__version__ = "0.1.0"
