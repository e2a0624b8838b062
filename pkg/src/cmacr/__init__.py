"""Rate regions and linear-code relaying for the compound multiple-access
channel with a relay (two sources, two receivers, one relay)."""

__version__ = "0.1.0"
