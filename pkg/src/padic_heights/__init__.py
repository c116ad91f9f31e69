"""Local p-adic heights on hyperelliptic curves."""
