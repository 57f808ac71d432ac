# Utils package for the eigen-domain channel generator
