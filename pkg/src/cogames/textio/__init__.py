"""Document parsing, rendering and the command line."""
