"""Tunable thresholds for detection, attribution and tracing.

Every number here is a methodological default, not ground truth; reports
embed the full snapshot so evidence stays auditable.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from chainsleuth.errors import ConfigError
from chainsleuth.units import WEI_PER_ETH


@dataclass(frozen=True)
class DetectionConfig:
    # scam window: reserves falling this share below their max counts as a drain
    drain_threshold: float = 0.9
    # liquidity removal recovering at least this share of reserves is a full exit
    remove_share: float = 0.9
    # pump-and-dump: rise factor from first trade to peak, collapse share from peak
    pump_rise_factor: float = 5.0
    pump_collapse: float = 0.9
    # sells counted toward the verdict only above this ETH total (wei)
    min_scammer_sell_wei: int = 0
    # include every address in revenue/spend instead of attributed ones only
    economics_all_addresses: bool = False

    def validate(self) -> None:
        if not (0 < self.drain_threshold <= 1):
            raise ConfigError("drain_threshold must be in (0, 1]")
        if not (0 < self.remove_share <= 1):
            raise ConfigError("remove_share must be in (0, 1]")
        if self.pump_rise_factor < 1:
            raise ConfigError("pump_rise_factor must be >= 1")
        if not (0 < self.pump_collapse < 1):
            raise ConfigError("pump_collapse must be in (0, 1)")
        if self.min_scammer_sell_wei < 0:
            raise ConfigError("min_scammer_sell_wei must be >= 0")


@dataclass(frozen=True)
class AttributionConfig:
    # sell within this fraction of the peak price marks a top seller
    top_seller_epsilon: float = 0.05
    # receiving this share of max potential profit within the window marks
    # suspected collusion
    spike_share: float = 0.25
    # funding-chain walkback depth for deployer funders
    funder_max_depth: int = 4
    # distinct thin tokens held before an address is annotated degen
    degen_token_count: int = 20

    def validate(self) -> None:
        if not (0 <= self.top_seller_epsilon < 1):
            raise ConfigError("top_seller_epsilon must be in [0, 1)")
        if not (0 < self.spike_share <= 1):
            raise ConfigError("spike_share must be in (0, 1]")
        if self.funder_max_depth < 1:
            raise ConfigError("funder_max_depth must be >= 1")


@dataclass(frozen=True)
class TraceConfig:
    max_depth: int = 6
    dust_threshold_wei: int = WEI_PER_ETH // 100  # 0.01 ETH
    # outgoing flows of very active addresses are only followed inside this
    # window after the traced funds arrive
    activity_txcount_cutoff: int = 50
    time_window_seconds: int = 72 * 3600
    # peel chains
    peel_min_hops: int = 3
    peel_forward_share: float = 0.8
    peel_max_hop_txcount: int = 10
    peel_max_hop_delay_seconds: int = 24 * 3600
    # burners
    burner_max_lifetime_tx: int = 10
    burner_inactivity_horizon_seconds: int = 7 * 24 * 3600
    # deposits at/above this trigger the KYC flag
    kyc_threshold_wei: int = WEI_PER_ETH  # 1 ETH
    # co-mingled exchange deposits from unattributed wallets are reported as
    # cash-out only up to this multiple of max potential profit
    cashout_plausibility: float = 1.0
    # token (ERC-20) flows recorded on edges may also drive expansion
    follow_token_flows: bool = False

    def validate(self) -> None:
        if self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1")
        if self.dust_threshold_wei < 0:
            raise ConfigError("dust_threshold_wei must be >= 0")
        if self.peel_min_hops < 1:
            raise ConfigError("peel_min_hops must be >= 1")
        if not (0 < self.peel_forward_share <= 1):
            raise ConfigError("peel_forward_share must be in (0, 1]")
        if self.peel_max_hop_txcount < 1:
            raise ConfigError("peel_max_hop_txcount must be >= 1")
        if self.burner_max_lifetime_tx < 1:
            raise ConfigError("burner_max_lifetime_tx must be >= 1")
        if self.kyc_threshold_wei < 0:
            raise ConfigError("kyc_threshold_wei must be >= 0")


@dataclass(frozen=True)
class InvestigationConfig:
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    attribution: AttributionConfig = field(default_factory=AttributionConfig)
    trace: TraceConfig = field(default_factory=TraceConfig)
    anonymize: bool = False

    def validate(self) -> None:
        self.detection.validate()
        self.attribution.validate()
        self.trace.validate()

    def snapshot(self) -> dict:
        """Flat provenance dict embedded in every report."""
        out: dict = {"anonymize": self.anonymize}
        for section_name in ("detection", "attribution", "trace"):
            section = getattr(self, section_name)
            for f in fields(section):
                out[f"{section_name}.{f.name}"] = getattr(section, f.name)
        return out

    @classmethod
    def from_overrides(cls, **overrides) -> "InvestigationConfig":
        """Build a config from flat override names like max_depth or pump_rise_factor."""
        det, att, tra, top = {}, {}, {}, {}
        det_names = {f.name for f in fields(DetectionConfig)}
        att_names = {f.name for f in fields(AttributionConfig)}
        tra_names = {f.name for f in fields(TraceConfig)}
        for key, value in overrides.items():
            if value is None:
                continue
            if key in det_names:
                det[key] = value
            elif key in att_names:
                att[key] = value
            elif key in tra_names:
                tra[key] = value
            elif key == "anonymize":
                top[key] = value
            else:
                raise ConfigError(f"unknown configuration override {key!r}")
        cfg = cls(
            detection=DetectionConfig(**det),
            attribution=AttributionConfig(**att),
            trace=TraceConfig(**tra),
            **top,
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)
