// Upper-tail reference values: (x, df, sf) and (z, sf).

const CHI: [(f64, f64, f64); 20] = [
    (0.5, 1.0, 0.47950012218695346232),
    (1.0, 1.0, 0.31731050786291410283),
    (3.841459, 1.0, 0.049999994653195766393),
    (6.634897, 1.0, 0.0099999977602824743099),
    (10.827566, 1.0, 0.0010000000921737462822),
    (0.1, 2.0, 0.95122942450071400645),
    (2.0, 2.0, 0.3678794411714423216),
    (5.991465, 2.0, 0.04999998867770083615),
    (1.0, 3.0, 0.80125195690120080243),
    (7.814728, 3.0, 0.049999997831966144105),
    (4.0, 4.0, 0.40600584970983807568),
    (9.487729, 4.0, 0.050000000759440033122),
    (11.0705, 5.0, 0.049999955428043651581),
    (3.0, 6.0, 0.80884683053805812988),
    (20.0, 10.0, 0.029252688076961072673),
    (18.307038, 10.0, 0.050000000824732262986),
    (50.0, 10.0, 2.6690834249044956397e-7),
    (100.0, 30.0, 1.8568023365102385923e-9),
    (2.5, 7.0, 0.92709706501347376501),
    (150.0, 3.0, 2.634913928488043582e-32),
];

const T: [(f64, f64, f64); 20] = [
    (0.0, 1.0, 0.5),
    (1.0, 1.0, 0.25),
    (-1.0, 1.0, 0.75),
    (2.0, 2.0, 0.091751709536136983634),
    (0.5, 3.0, 0.32572398242407549722),
    (2.5, 5.0, 0.027245049671188120558),
    (1.959964, 10.0, 0.039220463600577197579),
    (3.0, 10.0, 0.0066718275112847886034),
    (-2.0, 15.0, 0.96802749635763989857),
    (4.0, 20.0, 0.00035176164656415914474),
    (1.0, 30.0, 0.16265430771301494562),
    (2.0, 60.0, 0.025016521825728724414),
    (6.0, 8.0, 0.00016169661094257447769),
    (1.5, 4.0, 0.104),
    (0.25, 100.0, 0.40155010607661020263),
    (10.0, 3.0, 0.0010641995292070750287),
    (1.959964, 1000.0, 0.025138699611423285341),
    (3.5, 61.0, 0.00043784220440907364129),
    (-0.7, 7.0, 0.74674122390220009915),
    (5.0, 120.0, 9.8909529022698276618e-7),
];

const NORMAL: [(f64, f64); 20] = [
    (0.0, 0.5),
    (0.5, 0.30853753872598689636),
    (1.0, 0.15865525393145705141),
    (-1.0, 0.84134474606854294859),
    (1.959964, 0.024999999096442401994),
    (2.326348, 0.009999996642919080767),
    (2.575829, 0.0050000043892408149435),
    (3.0, 0.0013498980316300945267),
    (-2.0, 0.9772498680518207928),
    (4.0, 0.000031671241833119921254),
    (5.0, 2.8665157187919391167e-7),
    (6.0, 9.865876450376981407e-10),
    (8.0, 6.2209605742717841235e-16),
    (-0.3, 0.61791142218895263307),
    (0.1, 0.46017216272297101633),
    (1.5, 0.066807201268858066004),
    (2.5, 0.006209665325776135167),
    (3.5, 0.00023262907903552503635),
    (10.0, 7.619853024160526066e-24),
    (-3.0, 0.99865010196836990547),
];

