// Generated by tools/gen_bernoulli_table.py. Do not edit.
#pragma once

#include <array>

namespace nblab::detail {

/// B_{2k}/(2k)! for k = 1..100, stored at index k-1.
inline constexpr std::array<double, 100> kBernoulliOverFactorial{{
    0.083333333333333333333,
    -0.0013888888888888888889,
    0.000033068783068783068783,
    -8.2671957671957671958e-7,
    2.0876756987868098979e-8,
    -5.2841901386874931848e-10,
    1.3382536530684678833e-11,
    -3.3896802963225828668e-13,
    8.5860620562778445641e-15,
    -2.174868698558061873e-16,
    5.5090028283602295152e-18,
    -1.3954464685812523341e-19,
    3.5347070396294674717e-21,
    -8.9535174270375468504e-23,
    2.2679524523376830603e-24,
    -5.7447906688722024453e-26,
    1.4551724756148649019e-27,
    -3.6859949406653101782e-29,
    9.336734257095044672e-31,
    -2.3650224157006299346e-32,
    5.9906717624821343047e-34,
    -1.5174548844682902617e-35,
    3.8437581254541882322e-37,
    -9.7363530726466910353e-39,
    2.4662470442006809571e-40,
    -6.2470767418207436931e-42,
    1.5824030244644914298e-43,
    -4.0082736859489359685e-45,
    1.0153075855569556312e-46,
    -2.5718041582418717499e-48,
    6.5144560352338149316e-50,
    -1.6501309906896524555e-51,
    4.1798306285394758949e-53,
    -1.058763466770290877e-54,
    2.6818791912607706661e-56,
    -6.7932793511074212095e-58,
    1.7207577616681404905e-59,
    -4.3587303293488938434e-61,
    1.1040792903684666751e-62,
    -2.7966655133781345072e-64,
    7.0840365016794701985e-66,
    -1.7944074082892240666e-67,
    4.5452870636110961071e-69,
    -1.1513346631982051813e-70,
    2.9163647710923613547e-72,
    -7.3872382634973375626e-74,
    1.8712093117637953062e-75,
    -4.7398285577617994055e-77,
    1.200612599335450652e-78,
    -3.041187241514292383e-80,
    7.7034172747051062729e-82,
    -1.9512983909098830711e-83,
    4.9426965651594614749e-85,
    -1.2519996659171847922e-86,
    3.1713522017635154606e-88,
    -8.0331289707353344614e-90,
    2.0348153391661465708e-91,
    -5.1542474664474738591e-93,
    1.3055861352149467246e-94,
    -3.3070883141750912485e-96,
    8.376952560049091303e-98,
    -2.1219068717497137695e-99,
    5.3748528956122802563e-101,
    -1.3614661432172069393e-102,
    3.4486340279933990343e-104,
    -8.7354920416383550603e-106,
    2.2127259833925497084e-107,
    -5.6049003928372241708e-109,
    1.4197378549991787673e-110,
    -3.5962379982587626637e-112,
    9.1093772660782318646e-114,
    -2.3074322171091232885e-115,
    5.8447940852990019945e-117,
    -1.4805036371705744953e-118,
    3.7501595226227196891e-120,
    -9.4992650419929582974e-122,
    2.4061919444675198745e-123,
    -6.0949553971026847508e-125,
    1.5438702377042471456e-126,
    -3.9106689968592923201e-128,
    9.9058402898794297679e-130,
    -2.5091786578563553188e-131,
    6.3558237896024598054e-133,
    -1.6099489734616250397e-134,
    4.078048389872462247e-136,
    -1.0329817245315190214e-137,
    2.6165732752609201729e-139,
    -6.6278575334086228011e-141,
    1.6788559257443673052e-142,
    -4.2525917390343006216e-144,
    1.0771940713664572927e-145,
    -2.7285644580839579656e-147,
    6.9115345134370136912e-149,
    -1.7507121442157682495e-150,
    4.4346056667239195862e-152,
    -1.1232987378487149702e-153,
    2.8453489425693970936e-155,
    -7.2073530684151367967e-157,
    1.8256438595501417583e-158,
    -4.6244099189746554741e-160,
}};

}  // namespace nblab::detail
