"""Stand-level capital return under timber-sales and real-estate strategies."""
