"""Investigation engine for Ethereum DeFi rug pulls.

Reconstructs token lifecycles from on-chain event data, classifies rug
pull / pump-and-dump behaviour, bounds scammer profit, traces laundered
proceeds to terminal endpoints (exchanges, mixers, bridges), and emits
citation-backed evidence reports.
"""

__version__ = "0.1.0"
