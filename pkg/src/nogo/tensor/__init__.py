"""Abstract-index tensor calculus."""
