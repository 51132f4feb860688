"""Ext over the mod 2 Steenrod algebra for finite cell-complex modules, with Adams E2 charts."""

from .charts import ExtChart, OracleDisagreement, build_chart, fixture_aliases, load_aliases, render
from .gf2 import Gf2Matrix, Gf2Vector, kernel_basis, quotient_lift, rank, rref, solve
from .modules import (
    FDModule,
    ModuleElement,
    ModuleParseError,
    act,
    dual,
    load_fixture,
    load_module,
    normalize,
    parse_module,
    serialize,
    suspend,
    tensor,
    validate,
)
from .resolution import (
    ExtTable,
    HProducts,
    Resolution,
    ext_table,
    h_action,
    hom_complex_ext,
    load,
    resolve,
    save,
)
from .steenrod import SteenrodElement, Sq, adem_reduce, admissible_basis, antipode, multiply

__version__ = "0.1.0"
