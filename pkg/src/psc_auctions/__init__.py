"""Auctions followed by ex-post profit sharing: equilibrium bids, simulation and revenue."""

from .contracts import SharingContract, check_admissible, make_contract
from .equilibrium import (BidFunction, bid_eng, bid_general_sp, bid_plsc_sp, bid_posc_sp,
                          english_strategy, equilibrium_strategy_sp, invert_drop_prices)
from .info_model import (CommonValueAverage, CustomModel, Example1, Example2PA, InfoModel,
                         PrivateValues, make_model)
from .numerics import RandomStream
from .preferences import Utility, make_utility

__version__ = "0.1.0"

__all__ = [
    "BidFunction", "CommonValueAverage", "CustomModel", "Example1", "Example2PA", "InfoModel",
    "PrivateValues", "RandomStream", "SharingContract", "Utility", "bid_eng", "bid_general_sp",
    "bid_plsc_sp", "bid_posc_sp", "check_admissible", "english_strategy",
    "equilibrium_strategy_sp", "invert_drop_prices", "make_contract", "make_model",
    "make_utility",
]
