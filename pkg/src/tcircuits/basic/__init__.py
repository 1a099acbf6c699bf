"""Basic module specifications and a registry keyed by kind name."""

from __future__ import annotations

from .base import ConfigurationError, InterfaceError, ModuleSpec, Verdict
from .channel import ChannelInit, ChannelParams, ChannelSpec, channel_check, channel_generate, inertial_filter
from .gates import GATE_KINDS, GateSpec, gate_eval
from .mem import MemInit, MemParams, MemSpec, mem_check, mem_generate
from .reference import (AdderSpec, EnabledOscSpec, OscSpec, TMRAdderSpec, WMSpec, osc_spec_check,
                        wm_spec_check)
from .sources import SourceSpec, source_generate

_KINDS = {
    "channel": ChannelSpec,
    "gate": GateSpec,
    "mem": MemSpec,
    "source": SourceSpec,
    "osc": OscSpec,
    "wm": WMSpec,
    "enosc": EnabledOscSpec,
    "adder": AdderSpec,
    "adder_tmr": TMRAdderSpec,
}

MODULE_KINDS = tuple(_KINDS)


def make_module(kind: str, params: dict | None = None, name: str | None = None) -> ModuleSpec:
    """Instantiate a basic module from its kind name and (string-valued) parameters."""
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise ConfigurationError(f"unknown module kind {kind!r}; expected one of {MODULE_KINDS}") from None
    params = dict(params or {})
    if kind == "gate":
        for k in ("arity", "width"):
            if k in params:
                params[k] = int(params[k])
    if name is not None:
        params["name"] = name
    try:
        return cls(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {kind}: {exc}") from None


__all__ = [
    "AdderSpec", "ChannelInit", "ChannelParams", "ChannelSpec", "ConfigurationError", "EnabledOscSpec",
    "GATE_KINDS", "GateSpec", "InterfaceError", "MODULE_KINDS", "MemInit", "MemParams", "MemSpec",
    "ModuleSpec", "OscSpec", "SourceSpec", "TMRAdderSpec", "Verdict", "WMSpec", "channel_check",
    "channel_generate", "gate_eval", "inertial_filter", "make_module", "mem_check", "mem_generate",
    "osc_spec_check", "source_generate", "wm_spec_check",
]
