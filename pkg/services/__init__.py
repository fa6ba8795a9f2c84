# Services package





