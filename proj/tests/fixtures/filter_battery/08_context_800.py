def helper(v):
    return v
CONST_2 = 2
CONST_3 = 3
CONST_4 = 4
CONST_5 = 5
CONST_6 = 6
CONST_7 = 7
CONST_8 = 8
CONST_9 = 9
CONST_10 = 10
CONST_11 = 11
CONST_12 = 12
CONST_13 = 13
CONST_14 = 14
CONST_15 = 15
CONST_16 = 16
CONST_17 = 17
CONST_18 = 18
CONST_19 = 19
CONST_20 = 20
CONST_21 = 21
CONST_22 = 22
CONST_23 = 23
CONST_24 = 24
CONST_25 = 25
CONST_26 = 26
CONST_27 = 27
CONST_28 = 28
CONST_29 = 29
CONST_30 = 30
CONST_31 = 31
CONST_32 = 32
CONST_33 = 33
CONST_34 = 34
CONST_35 = 35
CONST_36 = 36
CONST_37 = 37
CONST_38 = 38
CONST_39 = 39
CONST_40 = 40
CONST_41 = 41
CONST_42 = 42
CONST_43 = 43
CONST_44 = 44
CONST_45 = 45
CONST_46 = 46
CONST_47 = 47
CONST_48 = 48
CONST_49 = 49
CONST_50 = 50
CONST_51 = 51
CONST_52 = 52
CONST_53 = 53
CONST_54 = 54
CONST_55 = 55
CONST_56 = 56
CONST_57 = 57
CONST_58 = 58
CONST_59 = 59
CONST_60 = 60
CONST_61 = 61
CONST_62 = 62
CONST_63 = 63
CONST_64 = 64
CONST_65 = 65
CONST_66 = 66
CONST_67 = 67
CONST_68 = 68
CONST_69 = 69
CONST_70 = 70
CONST_71 = 71
CONST_72 = 72
CONST_73 = 73
CONST_74 = 74
CONST_75 = 75
CONST_76 = 76
CONST_77 = 77
CONST_78 = 78
CONST_79 = 79
CONST_80 = 80
CONST_81 = 81
CONST_82 = 82
CONST_83 = 83
CONST_84 = 84
CONST_85 = 85
CONST_86 = 86
CONST_87 = 87
CONST_88 = 88
CONST_89 = 89
CONST_90 = 90
CONST_91 = 91
CONST_92 = 92
CONST_93 = 93
CONST_94 = 94
CONST_95 = 95
CONST_96 = 96
CONST_97 = 97
CONST_98 = 98
CONST_99 = 99
CONST_100 = 100
CONST_101 = 101
CONST_102 = 102
CONST_103 = 103
CONST_104 = 104
CONST_105 = 105
CONST_106 = 106
CONST_107 = 107
CONST_108 = 108
CONST_109 = 109
CONST_110 = 110
CONST_111 = 111
CONST_112 = 112
CONST_113 = 113
CONST_114 = 114
CONST_115 = 115
CONST_116 = 116
CONST_117 = 117
CONST_118 = 118
CONST_119 = 119
CONST_120 = 120
CONST_121 = 121
CONST_122 = 122
CONST_123 = 123
CONST_124 = 124
CONST_125 = 125
CONST_126 = 126
CONST_127 = 127
CONST_128 = 128
CONST_129 = 129
CONST_130 = 130
CONST_131 = 131
CONST_132 = 132
CONST_133 = 133
CONST_134 = 134
CONST_135 = 135
CONST_136 = 136
CONST_137 = 137
CONST_138 = 138
CONST_139 = 139
CONST_140 = 140
CONST_141 = 141
CONST_142 = 142
CONST_143 = 143
CONST_144 = 144
CONST_145 = 145
CONST_146 = 146
CONST_147 = 147
CONST_148 = 148
CONST_149 = 149
CONST_150 = 150
CONST_151 = 151
CONST_152 = 152
CONST_153 = 153
CONST_154 = 154
CONST_155 = 155
CONST_156 = 156
CONST_157 = 157
CONST_158 = 158
CONST_159 = 159
CONST_160 = 160
CONST_161 = 161
CONST_162 = 162
CONST_163 = 163
CONST_164 = 164
CONST_165 = 165
CONST_166 = 166
CONST_167 = 167
CONST_168 = 168
CONST_169 = 169
CONST_170 = 170
CONST_171 = 171
CONST_172 = 172
CONST_173 = 173
CONST_174 = 174
CONST_175 = 175
CONST_176 = 176
CONST_177 = 177
CONST_178 = 178
CONST_179 = 179
CONST_180 = 180
CONST_181 = 181
CONST_182 = 182
CONST_183 = 183
CONST_184 = 184
CONST_185 = 185
CONST_186 = 186
CONST_187 = 187
CONST_188 = 188
CONST_189 = 189
CONST_190 = 190
CONST_191 = 191
CONST_192 = 192
CONST_193 = 193
CONST_194 = 194
CONST_195 = 195
CONST_196 = 196
CONST_197 = 197
CONST_198 = 198
CONST_199 = 199
CONST_200 = 200
CONST_201 = 201
CONST_202 = 202
CONST_203 = 203
CONST_204 = 204
CONST_205 = 205
CONST_206 = 206
CONST_207 = 207
CONST_208 = 208
CONST_209 = 209
CONST_210 = 210
CONST_211 = 211
CONST_212 = 212
CONST_213 = 213
CONST_214 = 214
CONST_215 = 215
CONST_216 = 216
CONST_217 = 217
CONST_218 = 218
CONST_219 = 219
CONST_220 = 220
CONST_221 = 221
CONST_222 = 222
CONST_223 = 223
CONST_224 = 224
CONST_225 = 225
CONST_226 = 226
CONST_227 = 227
CONST_228 = 228
CONST_229 = 229
CONST_230 = 230
CONST_231 = 231
CONST_232 = 232
CONST_233 = 233
CONST_234 = 234
CONST_235 = 235
CONST_236 = 236
CONST_237 = 237
CONST_238 = 238
CONST_239 = 239
CONST_240 = 240
CONST_241 = 241
CONST_242 = 242
CONST_243 = 243
CONST_244 = 244
CONST_245 = 245
CONST_246 = 246
CONST_247 = 247
CONST_248 = 248
CONST_249 = 249
CONST_250 = 250
CONST_251 = 251
CONST_252 = 252
CONST_253 = 253
CONST_254 = 254
CONST_255 = 255
CONST_256 = 256
CONST_257 = 257
CONST_258 = 258
CONST_259 = 259
CONST_260 = 260
CONST_261 = 261
CONST_262 = 262
CONST_263 = 263
CONST_264 = 264
CONST_265 = 265
CONST_266 = 266
CONST_267 = 267
CONST_268 = 268
CONST_269 = 269
CONST_270 = 270
CONST_271 = 271
CONST_272 = 272
CONST_273 = 273
CONST_274 = 274
CONST_275 = 275
CONST_276 = 276
CONST_277 = 277
CONST_278 = 278
CONST_279 = 279
CONST_280 = 280
CONST_281 = 281
CONST_282 = 282
CONST_283 = 283
CONST_284 = 284
CONST_285 = 285
CONST_286 = 286
CONST_287 = 287
CONST_288 = 288
CONST_289 = 289
CONST_290 = 290
CONST_291 = 291
CONST_292 = 292
CONST_293 = 293
CONST_294 = 294
CONST_295 = 295
CONST_296 = 296
CONST_297 = 297
CONST_298 = 298
CONST_299 = 299
CONST_300 = 300
CONST_301 = 301
CONST_302 = 302
CONST_303 = 303
CONST_304 = 304
CONST_305 = 305
CONST_306 = 306
CONST_307 = 307
CONST_308 = 308
CONST_309 = 309
CONST_310 = 310
CONST_311 = 311
CONST_312 = 312
CONST_313 = 313
CONST_314 = 314
CONST_315 = 315
CONST_316 = 316
CONST_317 = 317
CONST_318 = 318
CONST_319 = 319
CONST_320 = 320
CONST_321 = 321
CONST_322 = 322
CONST_323 = 323
CONST_324 = 324
CONST_325 = 325
CONST_326 = 326
CONST_327 = 327
CONST_328 = 328
CONST_329 = 329
CONST_330 = 330
CONST_331 = 331
CONST_332 = 332
CONST_333 = 333
CONST_334 = 334
CONST_335 = 335
CONST_336 = 336
CONST_337 = 337
CONST_338 = 338
CONST_339 = 339
CONST_340 = 340
CONST_341 = 341
CONST_342 = 342
CONST_343 = 343
CONST_344 = 344
CONST_345 = 345
CONST_346 = 346
CONST_347 = 347
CONST_348 = 348
CONST_349 = 349
CONST_350 = 350
CONST_351 = 351
CONST_352 = 352
CONST_353 = 353
CONST_354 = 354
CONST_355 = 355
CONST_356 = 356
CONST_357 = 357
CONST_358 = 358
CONST_359 = 359
CONST_360 = 360
CONST_361 = 361
CONST_362 = 362
CONST_363 = 363
CONST_364 = 364
CONST_365 = 365
CONST_366 = 366
CONST_367 = 367
CONST_368 = 368
CONST_369 = 369
CONST_370 = 370
CONST_371 = 371
CONST_372 = 372
CONST_373 = 373
CONST_374 = 374
CONST_375 = 375
CONST_376 = 376
CONST_377 = 377
CONST_378 = 378
CONST_379 = 379
CONST_380 = 380
CONST_381 = 381
CONST_382 = 382
CONST_383 = 383
CONST_384 = 384
CONST_385 = 385
CONST_386 = 386
CONST_387 = 387
CONST_388 = 388
CONST_389 = 389
CONST_390 = 390
CONST_391 = 391
CONST_392 = 392
CONST_393 = 393
CONST_394 = 394
CONST_395 = 395
CONST_396 = 396
CONST_397 = 397
CONST_398 = 398
CONST_399 = 399
CONST_400 = 400
CONST_401 = 401
CONST_402 = 402
CONST_403 = 403
CONST_404 = 404
CONST_405 = 405
CONST_406 = 406
CONST_407 = 407
CONST_408 = 408
CONST_409 = 409
CONST_410 = 410
CONST_411 = 411
CONST_412 = 412
CONST_413 = 413
CONST_414 = 414
CONST_415 = 415
CONST_416 = 416
CONST_417 = 417
CONST_418 = 418
CONST_419 = 419
CONST_420 = 420
CONST_421 = 421
CONST_422 = 422
CONST_423 = 423
CONST_424 = 424
CONST_425 = 425
CONST_426 = 426
CONST_427 = 427
CONST_428 = 428
CONST_429 = 429
CONST_430 = 430
CONST_431 = 431
CONST_432 = 432
CONST_433 = 433
CONST_434 = 434
CONST_435 = 435
CONST_436 = 436
CONST_437 = 437
CONST_438 = 438
CONST_439 = 439
CONST_440 = 440
CONST_441 = 441
CONST_442 = 442
CONST_443 = 443
CONST_444 = 444
CONST_445 = 445
CONST_446 = 446
CONST_447 = 447
CONST_448 = 448
CONST_449 = 449
CONST_450 = 450
CONST_451 = 451
CONST_452 = 452
CONST_453 = 453
CONST_454 = 454
CONST_455 = 455
CONST_456 = 456
CONST_457 = 457
CONST_458 = 458
CONST_459 = 459
CONST_460 = 460
CONST_461 = 461
CONST_462 = 462
CONST_463 = 463
CONST_464 = 464
CONST_465 = 465
CONST_466 = 466
CONST_467 = 467
CONST_468 = 468
CONST_469 = 469
CONST_470 = 470
CONST_471 = 471
CONST_472 = 472
CONST_473 = 473
CONST_474 = 474
CONST_475 = 475
CONST_476 = 476
CONST_477 = 477
CONST_478 = 478
CONST_479 = 479
CONST_480 = 480
CONST_481 = 481
CONST_482 = 482
CONST_483 = 483
CONST_484 = 484
CONST_485 = 485
CONST_486 = 486
CONST_487 = 487
CONST_488 = 488
CONST_489 = 489
CONST_490 = 490
CONST_491 = 491
CONST_492 = 492
CONST_493 = 493
CONST_494 = 494
CONST_495 = 495
CONST_496 = 496
CONST_497 = 497
CONST_498 = 498
CONST_499 = 499
CONST_500 = 500
CONST_501 = 501
CONST_502 = 502
CONST_503 = 503
CONST_504 = 504
CONST_505 = 505
CONST_506 = 506
CONST_507 = 507
CONST_508 = 508
CONST_509 = 509
CONST_510 = 510
CONST_511 = 511
CONST_512 = 512
CONST_513 = 513
CONST_514 = 514
CONST_515 = 515
CONST_516 = 516
CONST_517 = 517
CONST_518 = 518
CONST_519 = 519
CONST_520 = 520
CONST_521 = 521
CONST_522 = 522
CONST_523 = 523
CONST_524 = 524
CONST_525 = 525
CONST_526 = 526
CONST_527 = 527
CONST_528 = 528
CONST_529 = 529
CONST_530 = 530
CONST_531 = 531
CONST_532 = 532
CONST_533 = 533
CONST_534 = 534
CONST_535 = 535
CONST_536 = 536
CONST_537 = 537
CONST_538 = 538
CONST_539 = 539
CONST_540 = 540
CONST_541 = 541
CONST_542 = 542
CONST_543 = 543
CONST_544 = 544
CONST_545 = 545
CONST_546 = 546
CONST_547 = 547
CONST_548 = 548
CONST_549 = 549
CONST_550 = 550
CONST_551 = 551
CONST_552 = 552
CONST_553 = 553
CONST_554 = 554
CONST_555 = 555
CONST_556 = 556
CONST_557 = 557
CONST_558 = 558
CONST_559 = 559
CONST_560 = 560
CONST_561 = 561
CONST_562 = 562
CONST_563 = 563
CONST_564 = 564
CONST_565 = 565
CONST_566 = 566
CONST_567 = 567
CONST_568 = 568
CONST_569 = 569
CONST_570 = 570
CONST_571 = 571
CONST_572 = 572
CONST_573 = 573
CONST_574 = 574
CONST_575 = 575
CONST_576 = 576
CONST_577 = 577
CONST_578 = 578
CONST_579 = 579
CONST_580 = 580
CONST_581 = 581
CONST_582 = 582
CONST_583 = 583
CONST_584 = 584
CONST_585 = 585
CONST_586 = 586
CONST_587 = 587
CONST_588 = 588
CONST_589 = 589
CONST_590 = 590
CONST_591 = 591
CONST_592 = 592
CONST_593 = 593
CONST_594 = 594
CONST_595 = 595
CONST_596 = 596
CONST_597 = 597
CONST_598 = 598
CONST_599 = 599
CONST_600 = 600
CONST_601 = 601
CONST_602 = 602
CONST_603 = 603
CONST_604 = 604
CONST_605 = 605
CONST_606 = 606
CONST_607 = 607
CONST_608 = 608
CONST_609 = 609
CONST_610 = 610
CONST_611 = 611
CONST_612 = 612
CONST_613 = 613
CONST_614 = 614
CONST_615 = 615
CONST_616 = 616
CONST_617 = 617
CONST_618 = 618
CONST_619 = 619
CONST_620 = 620
CONST_621 = 621
CONST_622 = 622
CONST_623 = 623
CONST_624 = 624
CONST_625 = 625
CONST_626 = 626
CONST_627 = 627
CONST_628 = 628
CONST_629 = 629
CONST_630 = 630
CONST_631 = 631
CONST_632 = 632
CONST_633 = 633
CONST_634 = 634
CONST_635 = 635
CONST_636 = 636
CONST_637 = 637
CONST_638 = 638
CONST_639 = 639
CONST_640 = 640
CONST_641 = 641
CONST_642 = 642
CONST_643 = 643
CONST_644 = 644
CONST_645 = 645
CONST_646 = 646
CONST_647 = 647
CONST_648 = 648
CONST_649 = 649
CONST_650 = 650
CONST_651 = 651
CONST_652 = 652
CONST_653 = 653
CONST_654 = 654
CONST_655 = 655
CONST_656 = 656
CONST_657 = 657
CONST_658 = 658
CONST_659 = 659
CONST_660 = 660
CONST_661 = 661
CONST_662 = 662
CONST_663 = 663
CONST_664 = 664
CONST_665 = 665
CONST_666 = 666
CONST_667 = 667
CONST_668 = 668
CONST_669 = 669
CONST_670 = 670
CONST_671 = 671
CONST_672 = 672
CONST_673 = 673
CONST_674 = 674
CONST_675 = 675
CONST_676 = 676
CONST_677 = 677
CONST_678 = 678
CONST_679 = 679
CONST_680 = 680
CONST_681 = 681
CONST_682 = 682
CONST_683 = 683
CONST_684 = 684
CONST_685 = 685
CONST_686 = 686
CONST_687 = 687
CONST_688 = 688
CONST_689 = 689
CONST_690 = 690
CONST_691 = 691
CONST_692 = 692
CONST_693 = 693
CONST_694 = 694
CONST_695 = 695
CONST_696 = 696
CONST_697 = 697
CONST_698 = 698
CONST_699 = 699
CONST_700 = 700
CONST_701 = 701
CONST_702 = 702
CONST_703 = 703
CONST_704 = 704
CONST_705 = 705
CONST_706 = 706
CONST_707 = 707
CONST_708 = 708
CONST_709 = 709
CONST_710 = 710
CONST_711 = 711
CONST_712 = 712
CONST_713 = 713
CONST_714 = 714
CONST_715 = 715
CONST_716 = 716
CONST_717 = 717
CONST_718 = 718
CONST_719 = 719
CONST_720 = 720
CONST_721 = 721
CONST_722 = 722
CONST_723 = 723
CONST_724 = 724
CONST_725 = 725
CONST_726 = 726
CONST_727 = 727
CONST_728 = 728
CONST_729 = 729
CONST_730 = 730
CONST_731 = 731
CONST_732 = 732
CONST_733 = 733
CONST_734 = 734
CONST_735 = 735
CONST_736 = 736
CONST_737 = 737
CONST_738 = 738
CONST_739 = 739
CONST_740 = 740
CONST_741 = 741
CONST_742 = 742
CONST_743 = 743
CONST_744 = 744
CONST_745 = 745
CONST_746 = 746
CONST_747 = 747
CONST_748 = 748
CONST_749 = 749
CONST_750 = 750
CONST_751 = 751
CONST_752 = 752
CONST_753 = 753
CONST_754 = 754
CONST_755 = 755
CONST_756 = 756
CONST_757 = 757
CONST_758 = 758
CONST_759 = 759
CONST_760 = 760
CONST_761 = 761
CONST_762 = 762
CONST_763 = 763
CONST_764 = 764
CONST_765 = 765
CONST_766 = 766
CONST_767 = 767
CONST_768 = 768
CONST_769 = 769
CONST_770 = 770
CONST_771 = 771
CONST_772 = 772
CONST_773 = 773
CONST_774 = 774
CONST_775 = 775
CONST_776 = 776
CONST_777 = 777
CONST_778 = 778
CONST_779 = 779
CONST_780 = 780
CONST_781 = 781
CONST_782 = 782
CONST_783 = 783
CONST_784 = 784
CONST_785 = 785
CONST_786 = 786
CONST_787 = 787
CONST_788 = 788
CONST_789 = 789
CONST_790 = 790
CONST_791 = 791
CONST_792 = 792
CONST_793 = 793
CONST_794 = 794
CONST_795 = 795
CONST_796 = 796
CONST_797 = 797
CONST_798 = 798
CONST_799 = 799


def compute(x):
    total = helper(x)
    return total
