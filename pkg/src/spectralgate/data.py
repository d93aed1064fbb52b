"""Shipped configuration: 21 balls of radius 1/2 covering the closed unit ball in R^3.

Found by minimax optimisation; certified at load time by ``certified_covering``.
"""

COVERING_3D = (
    (0.075134790213, 0.820719589376, 0.143559255598),
    (-0.555004041501, -0.468790863253, -0.409531610795),
    (-0.249550747363, -0.027515162350, 0.795154178908),
    (0.594852796664, -0.498160549041, -0.376436021939),
    (0.147916951416, 0.626938913886, -0.554392090157),
    (-0.093939626305, -0.829600657724, -0.146864264529),
    (0.373367953079, 0.400987237829, 0.644629441332),
    (0.058759429744, -0.416424937955, -0.730905309028),
    (0.836890449817, 0.053896090398, 0.073779594913),
    (-0.629695636120, -0.483943127399, 0.314074891400),
    (0.535380061426, 0.086422723939, -0.662419139638),
    (-0.058245852636, -0.627530775681, 0.551509257277),
    (0.668304956325, 0.533596360186, -0.048161115636),
    (-0.746242618564, 0.204318708631, 0.321777081657),
    (-0.508699428516, 0.634780185817, -0.243264841447),
    (-0.259986091622, 0.159840861274, -0.807727317214),
    (-0.791115793764, 0.018284009212, -0.295403438860),
    (0.527035262384, -0.612492759219, 0.195521606000),
    (0.476266163259, -0.153867460518, 0.676410536361),
    (-0.344830922768, 0.564172739539, 0.532368235171),
    (0.000461828527, 0.001584299696, -0.011931156509),
)
